#include "kdvb/cli.hpp"

int main(int argc, char** argv) { return kdvb::run_cli(argc, argv); }
