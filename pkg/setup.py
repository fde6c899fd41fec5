from sys import version
if version[0] != '3':
    raise RuntimeError('parallax is written for Python 3. Please install '
                       'for that version of Python.')

from setuptools import setup

setup(
    name            = "parallax",
    version         = open('VERSION').read().strip(),
    description     = "Simulation of GHZ-based threshold quantum secret sharing "
                      "with line-coefficient tables.",
    package_dir     = {"": "src"},
    packages        = ['parallax'],
    python_requires = ">=3.9",
    install_requires = open('requirements.txt').read().split(),
    extras_require  = {
        'test': ['hypothesis'],
    },
    entry_points    = {
        'console_scripts': ['parallax=parallax.cli:main'],
    },
    classifiers = [
        "Development Status :: 4 - Beta",
    ],
)
