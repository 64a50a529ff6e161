# -*- coding: utf-8 -*-
#
# fea2fea documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.  Values not set here keep their Sphinx defaults.

import os
import sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..')))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.todo',
]

source_suffix = '.rst'
master_doc = 'index'

project = u'fea2fea'
copyright = u'2021, fea2fea developers'
author = u'fea2fea developers'
version = u'0.1.0'
release = u'0.1.0'

pygments_style = 'sphinx'
todo_include_todos = True

# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'
html_last_updated_fmt = '%b %d %Y'
htmlhelp_basename = 'fea2fea-doc'

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'fea2fea', u'fea2fea Documentation', [author], 1)
]
