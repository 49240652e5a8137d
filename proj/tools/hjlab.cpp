#include "hjstab/cli.hpp"

int main(int argc, char** argv) { return hjstab::cli_main(argc, argv); }
