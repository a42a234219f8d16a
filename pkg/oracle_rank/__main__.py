from oracle_rank.cli import main

main()
