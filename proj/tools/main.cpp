#include "fbsde/fbsde.h"

int main(int argc, char** argv) {
  return fbsde_cli_main(argc - 1, argv + 1);
}
