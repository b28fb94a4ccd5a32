from setuptools import setup, find_packages

setup(
    name='pt-lab',
    version='0.1.0',
    packages=find_packages(where='src'),
    package_dir={'': 'src'},
    install_requires=[
        'numpy',
        'scipy',
        'PyYAML',
    ],
    entry_points={
        'console_scripts': ['ptlab=ptlab.cli:main'],
    },
)
