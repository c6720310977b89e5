import sys

from symscatter.process import cli_main

if __name__ == "__main__":
    sys.exit(cli_main(prog_name="symscatter"))
