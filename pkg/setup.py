from setuptools import setup

setup(
    name='darkmode',
    description='Dark-mode and exceptional-point analysis of multimode optomechanical sideband cooling',
    keywords='optomechanics, sideband cooling, dark mode, exceptional point',
    version='1.0',
    packages=['darkmode', 'darkmode.tests'],
    install_requires=['numpy>=1.17', 'scipy>=1.6', 'pandas>=1.5'],
    entry_points={
        'console_scripts': ['darkmode=darkmode.cli:main']
    },
    test_suite='darkmode.tests.runtests.runtests',
    tests_require=['pytest'],
    license='BSD',
)
