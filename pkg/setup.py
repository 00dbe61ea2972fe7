from setuptools import find_packages, setup

with open("README.md") as f:
    long_description = f.read()

with open("requirements.txt") as f:
    requirements = f.readlines()

with open("dev-requirements.txt") as f:
    dev_requirements = f.readlines()

setup(
    name="defuncq",
    version="0.0.1",
    description=(
        "A defunctionalizing compiler and differential interpreter for a "
        "higher-order XQuery subset."
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    package_data={
        "defuncq.corpus": ["programs/*.fq", "programs/corpus.yaml"],
    },
    entry_points={
        "console_scripts": ["defuncq = defuncq.__main__:main"],
    },
    python_requires=">=3.10",
    install_requires=requirements,
    extras_require={
        "dev": dev_requirements,
    },
)
