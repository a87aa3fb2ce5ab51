"""
Test runner for the beam-training unit tests.

Runs the suite through unittest discovery, optionally under coverage, and can
leave out the long Monte Carlo comparison cases for quick local checks.
"""

import sys
import unittest
from pathlib import Path

# Add project root and the tests directory to the import path
tests_dir = Path(__file__).parent
project_root = tests_dir.parent
for path in (project_root, tests_dir):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))

# Test classes that run hundreds of trials per sweep point
SLOW_CASES = {"TestSchemeOrdering"}


def _iter_cases(suite):
    for item in suite:
        if isinstance(item, unittest.TestSuite):
            yield from _iter_cases(item)
        else:
            yield item


def build_suite(pattern='test_*.py', skip_slow=False):
    """Discover tests under tests/, dropping the slow classes when asked."""
    suite = unittest.TestLoader().discover(str(tests_dir), pattern=pattern)
    if not skip_slow:
        return suite
    kept = [case for case in _iter_cases(suite) if type(case).__name__ not in SLOW_CASES]
    return unittest.TestSuite(kept)


def run_suite(suite, verbosity=2):
    return unittest.TextTestRunner(verbosity=verbosity).run(suite)


def run_specific_test_module(module_name, verbosity=2):
    """Run one module, e.g. test_fresnel_kernel or test_cli.TestSeedPrecedence."""
    suite = unittest.TestLoader().loadTestsFromName(module_name)
    return run_suite(suite, verbosity)


def run_with_coverage(suite, verbosity=2):
    """Run under coverage and write an HTML report next to the tests."""
    try:
        import coverage
    except ImportError:
        print("coverage is not installed; running without it (pip install coverage)")
        return run_suite(suite, verbosity)

    cov = coverage.Coverage(source=[str(project_root)], omit=["*/tests/*"])
    cov.start()
    result = run_suite(suite, verbosity)
    cov.stop()
    cov.save()

    print("\n" + "=" * 60)
    print("COVERAGE REPORT")
    print("=" * 60)
    cov.report()
    html_dir = tests_dir / 'coverage_html'
    cov.html_report(directory=str(html_dir))
    print(f"\nHTML coverage report generated in: {html_dir}/")
    return result


if __name__ == '__main__':
    import argparse

    parser = argparse.ArgumentParser(description='Run unit tests for the near-field beam-training simulator')
    parser.add_argument('--module', '-m', help='Run a specific test module or class')
    parser.add_argument('--coverage', '-c', action='store_true', help='Generate coverage report')
    parser.add_argument('--quick', '-q', action='store_true', help='Skip the long Monte Carlo comparisons')
    parser.add_argument('--verbose', '-v', action='store_true', help='Verbose output')

    args = parser.parse_args()
    verbosity = 2 if args.verbose else 1

    if args.module:
        result = run_specific_test_module(args.module, verbosity)
    else:
        suite = build_suite(skip_slow=args.quick)
        result = run_with_coverage(suite, verbosity) if args.coverage else run_suite(suite, verbosity)

    sys.exit(0 if result.wasSuccessful() else 1)
