"""Setup configuration for damped-kernel."""

from setuptools import setup, find_packages

setup(
    name='damped-kernel',
    version='1.0.0',
    description='Time-sliced path-integral propagator of the damped free particle',
    author='Your Name',
    packages=find_packages(include=['damped_kernel', 'damped_kernel.*']),
    python_requires='>=3.10',
    install_requires=[
        'numpy>=1.26',
        'scipy>=1.11',
        'python-dotenv==1.0.0',
        'PyYAML==6.0.1',
        'click==8.1.7',
        'colorama==0.4.6',
    ],
    entry_points={
        'console_scripts': ['damped-kernel=damped_kernel.cli:cli'],
    },
)
