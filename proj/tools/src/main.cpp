#include "wlingam/app/cli.hpp"

int main(int argc, char** argv) { return wlingam::app::run(argc, argv); }
