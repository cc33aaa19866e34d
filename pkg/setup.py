"""Setup for advreg: conditional GANs as regression predictive samplers."""

import os

from setuptools import find_packages, setup

IS_NOT_WINDOWS = os.name != "nt"

PARALLEL_REQUIRE = ["ray>=2.0.0"]
PYTYPE = ["pytype==2022.7.26"] if IS_NOT_WINDOWS else []
STABLE_BASELINES3 = "stable-baselines3>=1.7.0"

# Note: linters are pinned to known working versions to keep CI stable.
# torch is only a reference implementation in the gradient tests.
TESTS_REQUIRE = [
    "black~=22.6.0",
    "coverage>=6.4.2",
    "codespell~=2.1.0",
    "darglint~=1.8.1",
    "flake8~=4.0.1",
    "flake8-blind-except==0.2.1",
    "flake8-builtins~=1.5.3",
    "flake8-commas~=2.1.0",
    "flake8-debugger~=4.1.2",
    "flake8-docstrings~=1.6.0",
    "flake8-isort~=4.1.2",
    "hypothesis>=6.54.1",
    "mypy>=0.990",
    "pytest>=7.1.2",
    "pytest-cov>=3.0.0",
    "pytest-xdist>=2.5.0",
    "torch>=1.4.0",
    "setuptools_scm>=7.0.5",
    "pre-commit>=2.20.0",
] + PARALLEL_REQUIRE


def get_readme() -> str:
    """Retrieve content from README."""
    with open("README.md", "r", encoding="utf-8") as f:
        return f.read()


setup(
    name="advreg",
    use_scm_version={
        "local_scheme": "no-local-version",
        "fallback_version": "0.1.0",
    },
    setup_requires=["setuptools_scm"],
    description=(
        "Conditional GANs trained as samplers of a regression's "
        "predictive distribution."
    ),
    long_description=get_readme(),
    long_description_content_type="text/markdown",
    python_requires=">=3.8.0",
    packages=find_packages("src"),
    package_dir={"": "src"},
    package_data={"advreg": ["py.typed"]},
    # Note: install requirements are kept loose; only known incompatibilities
    #   are encoded here.
    install_requires=[
        "matplotlib",
        "numpy>=1.17",
        "pandas>=1.1",
        "scipy>=1.6",
        "tqdm",
        "scikit-learn>=0.21.2",
        STABLE_BASELINES3,
        "sacred>=0.8.4",
    ],
    tests_require=TESTS_REQUIRE,
    extras_require={
        # recommended packages for development
        "dev": [
            "autopep8",
            "ipdb",
            "isort~=5.0",
            "codespell",
            *TESTS_REQUIRE,
        ]
        + PYTYPE,
        "test": TESTS_REQUIRE,
        "parallel": PARALLEL_REQUIRE,
    },
    entry_points={
        "console_scripts": [
            "advreg-gen-data=advreg.scripts.gen_data:main_console",
            "advreg-train=advreg.scripts.train:main_console",
            "advreg-sweep=advreg.scripts.sweep:main_console",
            "advreg-ensemble=advreg.scripts.ensemble:main_console",
            "advreg-report=advreg.scripts.report:main_console",
        ],
    },
    license="MIT",
    classifiers=[
        # Trove classifiers
        # Full list: https://pypi.python.org/pypi?%3Aaction=list_classifiers
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: Implementation :: CPython",
    ],
)
