#!/usr/bin/python3
# Copyright (C) 2018, 2019, 2020, 2021, 2026, Hadron Industries, Inc.
# Lifpath is free software; you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3
# as published by the Free Software Foundation. It is distributed
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the file
# LICENSE for details.


from setuptools import setup

setup(
    name = "lifpath",
    license = "LGPL-3",
    include_package_data = True,
    maintainer = "Sam Hartman",
    maintainer_email = "sam.hartman@hadronindustries.com",
    packages = ["lifpath",
                'lifpath.config'],
    install_requires = ['numpy',
                        'scipy',
                        'pyyaml',
                        'pytest', ],
    scripts = ['bin/lifpath-runner'],
    version = "0.1",
)
