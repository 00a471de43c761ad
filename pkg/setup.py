#!/usr/bin/env python3

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="quantum-outcome-optimizer",
    version="0.1.0",
    author="Outcome Optimizer Team",
    description="Outcome-number robustness, state discrimination and simulability of quantum measurements",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["test", "test.*", "demo", "demo.*"]),
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Physics",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.24.0",
        "cvxpy>=1.4.0",
        "clarabel>=0.6.0",
        "scs>=3.2.0",
        "pandas>=2.0.0",
        "joblib>=1.3.0",
        "pydantic>=2.0.0",
    ],
    extras_require={
        "dev": [
            "pytest>=7.4.0",
            "pytest-cov>=4.1.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "outcome-optimizer=outcome_optimizer.cli:main",
        ],
    },
    keywords="quantum measurements, POVM, semidefinite programming, state discrimination, robustness",
)
