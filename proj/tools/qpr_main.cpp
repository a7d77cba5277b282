#include "qpr/cli.hpp"

int main(int argc, char** argv) { return qpr::run_cli(argc, argv); }
