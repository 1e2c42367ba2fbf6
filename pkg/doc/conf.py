# -*- coding: utf-8 -*-
#
# ltae documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

sys.path.insert(0, os.path.join('..'))

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.intersphinx', 'sphinx.ext.todo',
              'sphinx.ext.coverage', 'sphinx.ext.doctest']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'ltae'
copyright = u'2026, the ltae developers'

# The version is written by setuptools_scm at build time.
try:
    from ltae.version import version as release
except ImportError:
    release = '0.1.0'
version = '.'.join(release.split('.')[:2])

exclude_trees = ['_build']

pygments_style = 'sphinx'


# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'

html_static_path = ['_static']

html_show_sourcelink = True

htmlhelp_basename = 'ltaedoc'


# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
  ('index', 'ltae.tex', u'ltae Documentation',
   u'the ltae developers', 'manual'),
]


intersphinx_mapping = {'python': ('https://docs.python.org/3/', None),
                       'numpy': ('https://numpy.org/doc/stable/', None),
                       }


autoclass_content = "both"
