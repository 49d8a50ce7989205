"""Main entry point for the fracvp command line"""
from fracvp.cli import main

if __name__ == '__main__':
    main()
