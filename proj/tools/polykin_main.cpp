// polykin command-line driver (under construction; subcommands land with the
// engine modules).

#include <cstdio>

int main(int, char**) {
  std::printf("polykin: no subcommands wired up yet\n");
  return 2;
}
