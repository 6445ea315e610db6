#include "cinekit/cli.hpp"

int main(int argc, char** argv) { return ck::run_cli(argc, argv); }
