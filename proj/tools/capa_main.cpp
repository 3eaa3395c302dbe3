#include "capa/cli.hpp"

int main(int argc, char** argv) { return capa::cli::run(argc, argv); }
