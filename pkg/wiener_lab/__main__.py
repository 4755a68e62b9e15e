# wiener_lab/__main__.py

from wiener_lab.cli.main import main

main()
