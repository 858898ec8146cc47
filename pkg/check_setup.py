#!/usr/bin/env python3
"""
fracwave setup check
====================
Packages, example configs and a couple of reference values.

Usage:
    python check_setup.py
"""

import math
import sys
from pathlib import Path


def print_header(text):
    print("\n" + "=" * 70)
    print(f"  {text}")
    print("=" * 70)


def check_item(name, condition, details=""):
    status = "✅" if condition else "❌"
    print(f"{status} {name}")
    if details and condition:
        print(f"   {details}")
    return condition


def check_packages():
    packages = {
        'numpy': 'NumPy',
        'scipy': 'SciPy',
        'pandas': 'pandas',
        'mpmath': 'mpmath',
        'tqdm': 'TQDM',
        'yaml': 'PyYAML',
        'pytz': 'pytz',
        'pytest': 'pytest',
    }
    installed = {}
    for pkg, name in packages.items():
        try:
            module = __import__(pkg)
            installed[name] = getattr(module, '__version__', '')
        except ImportError:
            installed[name] = None
    return installed


def check_configs():
    from fracwave_utils import ConfigError, ExperimentConfig
    found = {}
    for path in sorted(Path('configs').glob('*.*')):
        try:
            config = ExperimentConfig.load(str(path))
            found[path.name] = (True, config.experiment)
        except ConfigError as e:
            found[path.name] = (False, str(e))
    return found


def check_values():
    from specfun_utils import mittag_leffler, wright_phi
    return {
        'E_{1,1}(1) = e': abs(mittag_leffler(1.0, 1.0, 1.0).value - math.e) < 1e-13,
        'E_{2,1}(-1) = cos 1': abs(mittag_leffler(2.0, 1.0, -1.0).value - math.cos(1.0)) < 1e-13,
        'Phi(-1/2, 1/2; -1) = exp(-1/4)/sqrt(pi)':
            abs(wright_phi(-0.5, 0.5, -1.0).value - math.exp(-0.25)/math.sqrt(math.pi)) < 1e-12,
    }


def main():
    print_header("🔍 fracwave Setup Check")

    print_header("1. Python Packages")
    packages = check_packages()
    for name, version in packages.items():
        check_item(name, version is not None, version)
    packages_ok = all(v is not None for v in packages.values())
    if not packages_ok:
        print("\n   Install missing packages:")
        print("   uv pip install -r requirements.txt")
        print("\n" + "=" * 70 + "\n")
        return False

    print_header("2. Example Configs")
    configs = check_configs()
    for name, (ok, details) in configs.items():
        check_item(name, ok, details)
        if not ok:
            print(f"   {details}")
    configs_ok = bool(configs) and all(ok for ok, _ in configs.values())

    print_header("3. Reference Values")
    values = check_values()
    for name, ok in values.items():
        check_item(name, ok)
    values_ok = all(values.values())

    print("\n" + "=" * 70 + "\n")
    return configs_ok and values_ok


if __name__ == '__main__':
    sys.exit(0 if main() else 1)
