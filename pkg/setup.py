from distutils.util import convert_path
from setuptools import setup, find_packages
from os import path

here = path.abspath(path.dirname(__file__))
metadata = dict()
with open(convert_path('src/setvalued/version.py')) as metadata_file:
    exec(metadata_file.read(), metadata)

setup(
    name='setvalued',
    version=metadata['__version__'],
    zip_safe=False,

    description='Metric projections, Hausdorff geometry and successive approximations for set-valued maps',

    license='GPL',

    packages=find_packages('src'),
    package_dir={'': 'src'},

    install_requires=[
        'orjson>=3.0.0',
        'deepdiff>=4.0.5',
        'inflection==0.3.1',
        'numpy>=1.20.0',
        'scipy>=1.9.0',
    ],
    tests_require=[
        'pytest',
        'hypothesis',
    ],
    entry_points={
        'console_scripts': ['setvalued=setvalued.cli:run'],
    },
)
