#include "mwu/cli.hpp"

int main(int argc, char** argv) { return mwu::run_cli(argc, argv); }
