#include "tcone/cli.hpp"

int main(int argc, char** argv) { return tcone::cli::run(argc, argv); }
