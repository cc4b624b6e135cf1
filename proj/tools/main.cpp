#include "fluctrack/harness/commands.hpp"

int main(int argc, char** argv) { return fluctrack::harness::run_cli(argc, argv); }
