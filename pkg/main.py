#!/usr/bin/env python3
"""
Main CLI Entry Point for the NC phase-space toolkit
Usage: python main.py [command] --scenario <path> [options]
"""
import sys

from src.cli import main

if __name__ == '__main__':
    sys.exit(main())
