from setuptools import setup, find_packages


setup(name='sgdlab',
      version='0.1.0',
      packages=find_packages(exclude=['examples', 'examples.*']),
      description='sgdlab: invariant distributions and flat-minimum selection of continuous-time SGD',
      long_description=open('README.md').read(),
      long_description_content_type="text/markdown",
      author='sgdlab Developers',
      license='Revised BSD',
      install_requires=['pyomo>=6.4.1', 'numpy', 'scipy'],
      extras_require={'mpi': ['mpi4py'], 'progress': ['tqdm']},
      include_package_data=True,
      package_data={'sgdlab.experiments': ['configs/*.json']},
      entry_points={'console_scripts': ['sgdlab=sgdlab.experiments.cli:main']},
      python_requires='>=3.7',
      classifiers=["Programming Language :: Python :: 3",
                   "Programming Language :: Python :: 3.7",
                   "Programming Language :: Python :: 3.8",
                   "Programming Language :: Python :: 3.9",
                   "Programming Language :: Python :: 3.10",
                   "Programming Language :: Python :: 3.11",
                   "License :: OSI Approved :: BSD License",
                   "Operating System :: OS Independent"])
