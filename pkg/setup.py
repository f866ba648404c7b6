# Copyright (c) wcanon authors.
# All rights reserved.

# This source code is licensed under the license found in the
# LICENSE file in the root directory of this source tree.

from setuptools import find_packages, setup

# Package metadata
NAME = "wcanon"
VERSION = "1.0"
DESCRIPTION = (
    "wcanon: quantized W-canonical transformations, their eigenbases and "
    "the generalized W-Fourier transform"
)
URL = "https://github.com/wcanon/wcanon"
AUTHOR = "wcanon authors"
AUTHOR_EMAIL = "wcanon@users.noreply.github.com"
LICENSE = "BSD-3-Clause"

# Read the contents of README file
with open("README.md", "r", encoding="utf-8") as f:
    LONG_DESCRIPTION = f.read()

# Required dependencies
REQUIRED_PACKAGES = [
    "numpy>=1.24.4",
    "scipy>=1.10.0",
    "tqdm>=4.66.1",
    "hydra-core>=1.3.2",
    "iopath>=0.1.10",
]

EXTRA_PACKAGES = {
    "dev": [
        "black==24.2.0",
        "usort==1.0.2",
        "ufmt==2.0.0b2",
        "pytest>=7.4.0",
    ],
}


# Setup configuration
setup(
    name=NAME,
    version=VERSION,
    description=DESCRIPTION,
    long_description=LONG_DESCRIPTION,
    long_description_content_type="text/markdown",
    url=URL,
    author=AUTHOR,
    author_email=AUTHOR_EMAIL,
    license=LICENSE,
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    package_data={"wcanon": ["configs/*.yaml"]},
    install_requires=REQUIRED_PACKAGES,
    extras_require=EXTRA_PACKAGES,
    python_requires=">=3.10.0",
    entry_points={"console_scripts": ["wcanon=wcanon.cli:main"]},
)
