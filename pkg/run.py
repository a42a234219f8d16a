"""
Startup script for the oracle-rank command-line interface
"""
from oracle_rank.cli import main

if __name__ == "__main__":
    main()
