import io
import os
from setuptools import setup, find_packages

ROOT_DIR = os.path.dirname(__file__)

setup(
    name="ldtt",
    packages=find_packages(),
    version="0.0.1",
    description=("Checker for dependent type theory with a linear fragment, "
                 "with finite semantic models"),
    long_description=io.open(
        os.path.join(ROOT_DIR, "README.md"), "r", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    install_requires=open("./requirements.txt").read(),
    package_data={"ldtt": ["prelude/*.ldtt"]},
    entry_points={"console_scripts": ["ldtt=ldtt.cli:main"]},
    python_requires=">=3.8",
)
