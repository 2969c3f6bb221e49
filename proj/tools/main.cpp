#include "cli.hpp"

int main(int argc, char** argv) { return tve::run_cli(argc, argv); }
