#
# retropt documentation build configuration file.
#

import sys
import os.path

import sphinx_rtd_theme

sys.path.append(os.path.abspath('.'))
sys.path.append(os.path.abspath('doc'))
sys.path.insert(0, os.path.abspath('..'))

import retropt

extensions = [
    'sphinx.ext.autodoc', 'sphinx.ext.autosummary', 'sphinx.ext.doctest',
    'sphinx.ext.todo', 'sphinx.ext.viewcode', 'sphinx.ext.mathjax'
]
project = 'retropt'
source_suffix = '.rst'
master_doc = 'index'
version = release = retropt.__version__
copyright = 'retropt developers'
epub_basename = 'retropt - {}'.format(version)
epub_author = 'retropt developers'
todo_include_todos = True
html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

# vim: sw=4:et:ai
