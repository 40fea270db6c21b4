#include "qutrit/cli.hpp"

int main(int argc, char** argv) { return qutrit::cli_main(argc, argv); }
