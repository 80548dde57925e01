#!/usr/bin/env python
# coding=utf-8

import sys

try:
    from setuptools import setup, find_packages
except ImportError:
    try:
        from ez_setup import use_setuptools

        use_setuptools()
        from setuptools import setup, find_packages
    except ImportError:
        sys.stderr.write(
            "Could not import setuptools; make sure you have setuptools or "
            "ez_setup installed.\n"
        )
        raise

requirements = ['numpy', 'sympy', 'mpmath', 'fysom']


if __name__ == '__main__':
    setup(
        name="pysqrlat",
        version="0.1.0",
        description="Square roots of lattice points, Fourier non-uniqueness and Hecke group interpolation",
        packages=find_packages(exclude=['examples', 'examples.*']),
        install_requires=requirements,
        extras_require={'dev': ['pytest', 'pytest-mock', 'pytest-pep8', 'pytest-cov', 'scipy']},
        entry_points={'console_scripts': ['sqrlat = pysqrlat.cli:main']},
        python_requires='>=3.8',
    )
