#!/usr/bin/env python3
"""
Test runner for tardylab.
Runs the unit, integration and end-to-end suites through pytest and prints a summary.
"""

import sys
import os
import time
from datetime import datetime

import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
SUITES = ["unit", "integration", "e2e"]


def print_banner():
    """Print test banner."""
    print("tardylab test suite")
    print("=" * 60)
    print(f"Test Run: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print("=" * 60)


def run_suite(name: str, extra_args) -> bool:
    print(f"\n{name}")
    print("-" * 30)
    return pytest.main([os.path.join(TESTS_DIR, name), "-q", *extra_args]) == 0


def run_all_tests(extra_args) -> bool:
    """Run every suite and print a summary."""
    print_banner()
    start_time = time.time()
    results = {name: run_suite(name, extra_args) for name in SUITES}
    duration = time.time() - start_time

    print("\n" + "=" * 60)
    print("SUMMARY")
    print("=" * 60)
    print(f"Duration: {duration:.2f} seconds")
    for name, passed in results.items():
        print(f"{'PASS' if passed else 'FAIL'} {name}")
    print("=" * 60)
    return all(results.values())


def main():
    """Main test runner entry point."""
    try:
        return 0 if run_all_tests(sys.argv[1:]) else 1
    except KeyboardInterrupt:
        print("\n\nTest run interrupted by user")
        return 1


if __name__ == "__main__":
    sys.exit(main())
