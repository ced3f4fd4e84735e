from polyneck.cli import main

main()
