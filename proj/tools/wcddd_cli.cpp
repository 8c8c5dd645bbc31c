#include "wcddd/cli.hpp"

int main(int argc, char** argv) { return wcddd::run(argc, argv); }
