import pytest


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run acceptance-scale tests')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: acceptance-scale run (minutes), needs --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


class _CheckMarks:
    def __init__(self):
        self.failed = 0

    def pytest_runtest_logreport(self, report):
        if report.when == 'call' or (report.when == 'setup' and not report.passed):
            if report.skipped:
                print("⏭  "+report.nodeid)
            elif report.passed:
                print("✅ "+report.nodeid)
            else:
                self.failed += 1
                print("❌ "+report.nodeid)


def run_file(path, title):
    """Run one test file as a script: banner plus one ✅/❌ line per check."""
    print("=" * 60)
    print(title)
    print("=" * 60)
    marks = _CheckMarks()
    code = pytest.main([path, '-q', '-p', 'no:cacheprovider'], plugins=[marks])
    print("=" * 60)
    print("✅ All checks passed" if code == 0 else "❌ "+str(marks.failed)+" check(s) failed")
    return int(code)
