from setuptools import setup, find_packages

setup(
    name="cifc-regions",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"cifc_regions": ["templates/*.j2"]},
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.8",
        "pydantic~=2.6",
        "jinja2>=3.1.0"
    ],
    extras_require={
        "test": [
            "pytest",
            "pytest-mock",
            "coverage"
        ]
    },
    entry_points={
        "console_scripts": [
            "cifc=cifc_regions.cli:main"
        ]
    }
)
