#include "euleralign/io.hpp"

int main(int argc, char** argv) { return euleralign::cli_main(argc, argv); }
