#include "bdsvie/cli.hpp"

int main(int argc, char** argv) { return bdsvie::cli::run(argc, argv); }
