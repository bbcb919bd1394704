#include "cli.hpp"

int main(int argc, char** argv) { return fried::run_cli(argc, argv); }
