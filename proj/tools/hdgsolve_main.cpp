#include "hdg/cli.hpp"

int main(int argc, char** argv) { return hdg::run_cli(argc, argv); }
