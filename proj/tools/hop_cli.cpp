// Placeholder while the library comes up; subcommands land with the modules.
int main() { return 0; }
