# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    setup.py
#     Author:  fea2fea developers
#     Date:    2021-06-14
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.

#
# Imports
#

import logging
import os
import subprocess

import setuptools

#
# Module level variables and calls
#

# package and module metadata
PACKAGE_NAME = 'fea2fea'
PACKAGE_VERSION = '0.1.0'
ROOT_MODULE_NAME = 'fea2fea'

# setup logging
logging.basicConfig(level=logging.WARNING)


#
# Utilities
#

def my_find_packages(*args):
    """A custom package finder to use instead of setuptools.find_packages()"""
    packages = []
    for root_module_dir in args:
        for root, _, files in os.walk(root_module_dir):
            if '__init__.py' in files:
                packages.append(root.replace(os.sep, '.'))
    return packages


#
# Custom Commands
#

class PylintCommand(setuptools.Command):
    """Custom command to run Pylint"""

    description = "Run pylint on all source code"
    user_options = []

    def initialize_options(self):
        pass

    def finalize_options(self):
        pass

    def run(self):
        """Run pylint"""
        subprocess.check_call(['pylint', ROOT_MODULE_NAME])


#
# Main logic
#

setuptools.setup(
    author='fea2fea developers',
    author_email='fea2fea@localhost',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
    cmdclass={
        "pylint": PylintCommand,
    },
    command_options={
        'build_sphinx': {
            'project': ('setup.py', PACKAGE_NAME),
            'version': ('setup.py', PACKAGE_VERSION),
            'release': ('setup.py', PACKAGE_VERSION)
        }
    },
    description=" ".join([
        'Structural feature prediction between graph features with graph neural networks, ',
        'and structural feature augmentation for node and graph classification',
    ]),
    install_requires=[
        'click>=7.0',
        'jsonschema>=2.5.1',
        'numpy>=1.20',
        'scipy>=1.3',
    ],
    keywords=['graph neural networks', 'structural features'],
    license='Apache 2.0',
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    name=PACKAGE_NAME,
    packages=my_find_packages(ROOT_MODULE_NAME),
    python_requires='>=3.6',
    test_suite='tests',
    tests_require=[
        'coverage>=4.1',
        'mock>=2.0.0',
        'pytest>=3.6',
        'pytest-cov>=2.5',
        'testfixtures>=4.10.0',
    ],
    entry_points={
        'console_scripts': ['fea2fea=fea2fea.util.cli:main'],
    },
    url='http://localhost',
    version=PACKAGE_VERSION,
    zip_safe=False,
)
