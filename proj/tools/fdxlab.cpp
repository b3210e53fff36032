#include "fdxlab/cli.hpp"

int main(int argc, char** argv) { return fdxlab::cli::run(argc, argv); }
