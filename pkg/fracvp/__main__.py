"""Allow ``python -m fracvp``"""
from fracvp.cli import main

if __name__ == '__main__':
    main()
