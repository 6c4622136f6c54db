#include "greedcert/cli.hpp"

int main(int argc, char** argv) { return greedcert::run_cli(argc, argv); }
