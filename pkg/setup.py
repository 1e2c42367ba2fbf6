#!/usr/bin/env python
from setuptools import setup

with open('README.rst') as file_:
    LONG_DESCRIPTION = file_.read()


setup(name='ltae',
      use_scm_version={"version_scheme": "post-release",
                       "write_to": "ltae/version.py",
                       "fallback_version": "0.1.0"},
      setup_requires=['setuptools_scm'],
      install_requires=['numpy'],
      python_requires='>=3.8',
      description='Latent space transformation autoencoders with Hausdorff evaluation',
      packages=['ltae',
                'ltae.nn',
                ],
      entry_points={
          'console_scripts': ['ltae = ltae.cli:main'],
      },
      long_description=LONG_DESCRIPTION,
      classifiers=[
          'Development Status :: 4 - Beta',
          'Intended Audience :: Science/Research',
          'Topic :: Scientific/Engineering :: Artificial Intelligence',
          'Programming Language :: Python :: 3',
      ],
)
