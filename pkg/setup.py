#!/usr/bin/env python

from setuptools import setup

setup(
    name='wegnerlab',
    version='0.1.0',
    description='Numerical checks of Wegner estimates for alloy-type random Schroedinger operators.',
    packages=[
        'wegnerlab',
    ],
    license="GNU General Public License (GPL) v3",
    test_suite='tests',
    python_requires='>=3.7',
    install_requires=[
        'numpy>=1.17',
        'scipy>=1.4',
        'PyYAML>=5.1',
        'pytz',
    ],
    entry_points={
        'console_scripts': [
            'wegnerlab=wegnerlab.cli:main',
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.7",
        "Programming Language :: Python :: 3.8",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    long_description="""A small python library and command line tool sampling random Schroedinger operators
on lattice boxes and comparing averaged eigenvalue counts with proven Wegner bounds."""
)
