// CLI entry point (subcommands wired in as the library comes together).
int main() { return 0; }
