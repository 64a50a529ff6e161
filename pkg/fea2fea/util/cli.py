# Copyright (C) 2021 The fea2fea Authors. All Rights Reserved.
#
#     File:    cli.py
#     Author:  fea2fea developers
#     Date:    2021-06-22
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.

"""
Command line driver for every pipeline stage

Each command reads an optional JSON run configuration, applies its flags
on top, echoes the result to ``<out>/config.json`` and writes its tables
next to it.  Exit codes: 0 success, 1 usage or configuration error, 2 bad
graph or feature data, 3 PageRank or training did not converge.
"""

import logging
import os
import sys

# Third Party
import click
import numpy as np

# Our module
from fea2fea.exceptions import (Fea2FeaException, FeatureException, GraphException,
                                PageRankConvergenceError, TrainingException)
from fea2fea.features import (FEATURE_NAMES, NodeFeatureMatrix, build_collection_features,
                              build_feature_matrix, feature_histograms)
from fea2fea.graph import NodeDataset, generate_random_geometric, save_edge_list
from fea2fea.nn import MODEL_TYPES
from fea2fea.pipeline import (CONCAT_METHODS, GRAPH_MODE, NODE_MODE, CorrelationMatrix,
                              build_correlation_matrix, classify, evaluate_pair, run_multiple,
                              summary_rows, write_report)
from fea2fea.pipeline.application import NODE_SPLITS, READOUTS
from fea2fea.features.binning import STRATEGIES
from .config import DATASET_TYPES, RunConfig
from .export import (COMBINATION_FIELDS, SUMMARY_FIELDS, combination_rows, read_json, write_csv,
                     write_json)
from .seeds import derive_seed

LOGGER = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONVERGENCE = 3

SWEEP_PARAMS = ('bins', 'depth', 'threshold')
SWEEP_DEFAULTS = {
    'bins': '2..10',
    'depth': '2,4,6,8,10',
    'threshold': '0.5..1.0:0.1',
}
SWEEP_FIELDS = ('param', 'value', 'status', 'accuracy', 'std', 'survivors', 'error')


def exit_code_for(error):
    """ Process exit code of a library exception """
    if isinstance(error, (PageRankConvergenceError, TrainingException)):
        return EXIT_CONVERGENCE
    if isinstance(error, (GraphException, FeatureException)):
        return EXIT_DATA
    return EXIT_USAGE


class Fea2FeaGroup(click.Group):
    """ Command group that turns library exceptions into exit codes """

    def main(self, *args, **kwargs):  # pylint: disable=arguments-differ
        kwargs['standalone_mode'] = False
        try:
            return super(Fea2FeaGroup, self).main(*args, **kwargs)
        except click.ClickException as error:
            error.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        except Fea2FeaException as error:
            click.echo("Error: {}".format(error), err=True)
            sys.exit(exit_code_for(error))


def _apply(options, function):
    for option in reversed(options):
        function = option(function)
    return function


def run_options(function):
    """ Configuration file, output directory, dataset and seeding flags """
    return _apply([
        click.option('--config', 'config_path', type=click.Path(dir_okay=False),
                     help="JSON run configuration"),
        click.option('--out', 'out_dir', default='run', show_default=True,
                     type=click.Path(file_okay=False), help="Run directory"),
        click.option('--dataset-type', type=click.Choice(DATASET_TYPES), help="Dataset source"),
        click.option('--path', 'dataset_path', help="Edge list file or dataset directory"),
        click.option('--name', 'dataset_name', help="TUDataset or LINQS dataset name"),
        click.option('--n', 'num_nodes', type=int, help="Synthetic graph size"),
        click.option('--radius', type=float, help="Synthetic connection radius"),
        click.option('--seed', type=int, help="Root seed"),
        click.option('--seeds', 'num_seeds', type=int, help="Repetitions per model"),
        click.option('--split-seed', type=int, help="Seed of the data split"),
        click.option('--jobs', type=int, help="Worker processes, all cores by default"),
    ], function)


def model_options(function):
    """ Feature prediction model, binning and training flags """
    return _apply([
        click.option('--conv', 'conv_type', type=click.Choice(MODEL_TYPES, case_sensitive=False),
                     help="Convolution type"),
        click.option('--depth', type=int, help="Convolution blocks"),
        click.option('--hidden', 'hidden_dim', type=int, help="Hidden width"),
        click.option('--dropout', type=float, help="Dropout probability"),
        click.option('--batchnorm', is_flag=True, default=False, help="Batch normalisation"),
        click.option('--skip', is_flag=True, default=False, help="Skip connections"),
        click.option('--bins', 'num_bins', type=int, help="Bins per predicted feature"),
        click.option('--strategy', 'binning_strategy', type=click.Choice(STRATEGIES),
                     help="Binning strategy for every output"),
        click.option('--epochs', type=int, help="Epoch budget"),
        click.option('--lr', type=float, help="Learning rate"),
        click.option('--patience', type=int, help="Early stopping patience, 0 disables"),
    ], function)


def load_run(config_path, out_dir, options):
    """ Resolve the run configuration and echo it into out_dir

    Flag values of None (not given) and False (switch not set) leave the
    file or default value alone.
    """
    overrides = dict((key, list(value) if isinstance(value, tuple) else value)
                     for key, value in options.items()
                     if value is not None and value is not False and value != ())
    if 'conv_type' in overrides:
        overrides['conv_type'] = overrides['conv_type'].upper()
    config = RunConfig.from_file(config_path, overrides)
    config.write(out_dir)
    return config


def _feature_matrix(data):
    """ Structural features of a dataset in node, or union, order """
    if isinstance(data, NodeDataset):
        return build_feature_matrix(data.graph)
    return NodeFeatureMatrix(np.concatenate([m.values for m in build_collection_features(data)]))


def _correlation_matrix(config, data, out_dir):
    matrix = build_correlation_matrix(data, config.layer_config(), config.seeds(),
                                      config['num_bins'], config['binning_strategy'],
                                      config.train_config(), config['jobs'], config['split_seed'])
    matrix.to_json(os.path.join(out_dir, 'correlation.json'))
    matrix.to_csv(os.path.join(out_dir, 'correlation.csv'))
    return matrix


#
# MAIN Group
#
@click.group(cls=Fea2FeaGroup)
@click.option('--quiet', is_flag=True, help='Set console logging to WARNING or higher')
@click.option('--verbose', is_flag=True, help='Set console logging to DEBUG')
@click.pass_context
def cli(ctx, quiet, verbose):
    """ Structural feature prediction and augmentation for graphs """

    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    else:
        level = logging.INFO

    logging.basicConfig(level=level)
    ctx.ensure_object(dict)


@cli.command(help="Compute and export the structural feature matrix")
@run_options
def features(config_path, out_dir, **options):
    """ features.tsv with one row per node """

    config = load_run(config_path, out_dir, options)
    matrix = _feature_matrix(config.load_dataset())
    path = os.path.join(out_dir, 'features.tsv')
    matrix.to_tsv(path)
    click.echo("features: {} nodes -> {}".format(matrix.num_nodes, path))


@cli.command(help="Single feature prediction: fill the correlation matrix")
@run_options
@model_options
def single(config_path, out_dir, **options):
    """ correlation.csv and correlation.json """

    config = load_run(config_path, out_dir, options)
    matrix = _correlation_matrix(config, config.load_dataset(), out_dir)
    click.echo("single: {} 5x5 matrix, {} excluded cells -> {}".format(
        matrix.metadata.get('dataset'), int(matrix.excluded.sum()),
        os.path.join(out_dir, 'correlation.csv')))


@cli.command(help="Multiple feature prediction for one target feature")
@run_options
@model_options
@click.option('--target', type=click.Choice(FEATURE_NAMES), help="Predicted feature")
@click.option('--threshold', type=float, help="Redundancy threshold")
@click.option('--matrix', 'matrix_path', type=click.Path(exists=True, dir_okay=False),
              help="Reuse a correlation.json instead of training one")
@click.option('--method', 'concat_methods', multiple=True, type=click.Choice(CONCAT_METHODS),
              help="Concatenation methods, all by default")
@click.option('--embed-dim', type=int, help="Structural embedding width")
def multiple(config_path, out_dir, matrix_path, **options):
    """ combinations.json, combinations.csv and summary.csv """

    config = load_run(config_path, out_dir, options)
    data = config.load_dataset()
    if matrix_path:
        matrix = CorrelationMatrix.from_json(matrix_path)
    else:
        matrix = _correlation_matrix(config, data, out_dir)

    results = run_multiple(data, matrix, config.target_index(), config['threshold'],
                           config['concat_methods'], cfg=config.layer_config(), seeds=config.seeds(),
                           embed_dim=config['embed_dim'], num_bins=config['num_bins'],
                           strategy=config['binning_strategy'], train_config=config.train_config(),
                           split_seed=config['split_seed'], jobs=config['jobs'])

    write_json(os.path.join(out_dir, 'combinations.json'), [r.to_dict() for r in results])
    write_csv(os.path.join(out_dir, 'combinations.csv'), COMBINATION_FIELDS, combination_rows(results))
    write_csv(os.path.join(out_dir, 'summary.csv'), SUMMARY_FIELDS, summary_rows(results))
    click.echo("multiple: target {} threshold {}: {} results -> {}".format(
        config['target'], config['threshold'], len(results), os.path.join(out_dir, 'summary.csv')))


@cli.command('classify', help="Node or graph classification with structural augmentation")
@run_options
@click.option('--augment', multiple=True, type=click.Choice(FEATURE_NAMES),
              help="Structural feature to augment with, repeatable")
@click.option('--concat', 'concat_method', type=click.Choice(CONCAT_METHODS),
              help="Concatenation of the structural embeddings")
@click.option('--conv', 'classifier_conv', type=click.Choice(MODEL_TYPES, case_sensitive=False),
              help="Convolution of the classifier stack")
@click.option('--readout', type=click.Choice(READOUTS), help="Graph readout")
@click.option('--folds', 'num_folds', type=int, help="Cross validation folds")
@click.option('--split', type=click.Choice(NODE_SPLITS), help="Node split")
@click.option('--embed-dim', type=int, help="Structural embedding width")
@click.option('--epochs', type=int, help="Epoch budget")
@click.option('--patience', type=int, help="Early stopping patience, 0 disables")
@click.option('--embeddings', is_flag=True, help="Export embeddings.tsv")
@click.option('--history', is_flag=True, help="Export history-<n>.csv per seed")
def classify_command(config_path, out_dir, embeddings, history, **options):
    """ report.json and optionally embeddings.tsv and the training histories """

    config = load_run(config_path, out_dir, options)
    data = config.load_dataset()
    mode = NODE_MODE if isinstance(data, NodeDataset) else GRAPH_MODE

    report = classify(data, config.augment_config(mode), config.seeds(),
                      train_config=config.train_config(), split_seed=config['split_seed'],
                      jobs=config['jobs'], keep_embeddings=embeddings)
    write_report(report, os.path.join(out_dir, 'report.json'),
                 os.path.join(out_dir, 'embeddings.tsv') if embeddings else None)
    if history:
        report.write_histories(out_dir)
    click.echo("classify: {} {} accuracy {:.4f} +- {:.4f}".format(report.dataset, report.mode,
                                                               report.mean, report.std))


@cli.command(help="Generate random geometric graphs as edge lists")
@click.option('--n', 'num_nodes', type=int, default=400, show_default=True, help="Nodes per graph")
@click.option('--radius', type=float, help="Connection radius, 2 sqrt(ln n / (pi n)) by default")
@click.option('--seed', type=int, default=0, show_default=True, help="Root seed")
@click.option('--count', type=int, default=1, show_default=True, help="Number of graphs")
@click.option('--out', 'out_dir', default='synth', show_default=True,
              type=click.Path(file_okay=False), help="Output directory")
def synth(num_nodes, radius, seed, count, out_dir):
    """ One ``.edges`` file per graph """

    config = RunConfig({'dataset_type': 'synthetic', 'num_nodes': num_nodes, 'radius': radius,
                        'seed': seed})
    config.write(out_dir)
    paths = []
    for index in range(count):
        graph_seed = seed if count == 1 else derive_seed(seed, 'synth', index)
        graph = generate_random_geometric(num_nodes, radius, graph_seed)
        path = os.path.join(out_dir, "geometric_n{}_s{}_{:03d}.edges".format(num_nodes, seed, index))
        save_edge_list(graph, path)
        paths.append(path)
    click.echo("synth: {} graph(s) of {} nodes -> {}".format(count, num_nodes, out_dir))


def parse_values(param, text):
    """ Sweep values from ``a..b``, ``a..b:step`` or ``a,b,c``

    Bins and depth are integers, thresholds are rounded to 10 decimals.
    """
    text = (text or SWEEP_DEFAULTS[param]).strip()
    cast = float if param == 'threshold' else int
    try:
        if '..' in text:
            bounds, _, step = text.partition(':')
            low, high = (cast(x) for x in bounds.split('..'))
            step = cast(step) if step else cast(1)
            if step <= 0 or high < low:
                raise ValueError("empty range")
            count = int(round((high - low) / step)) + 1
            values = [low + index * step for index in range(count)]
        else:
            values = [cast(x) for x in text.split(',') if x.strip()]
    except ValueError as error:
        raise click.BadParameter("Cannot read range '{}': {}".format(text, error))
    if param == 'threshold':
        values = [round(v, 10) for v in values]
    if not values:
        raise click.BadParameter("Range '{}' is empty".format(text))
    return values


def _entry_row(param, value, entry):
    if entry.is_excluded:
        return {'param': param, 'value': value, 'status': 'excluded', 'accuracy': None,
                'std': None, 'survivors': None, 'error': entry.reason}
    return {'param': param, 'value': value, 'status': 'ok', 'accuracy': entry.value,
            'std': entry.std, 'survivors': None, 'error': None}


def sweep_cell(param, value, config, data, pair, matrix_loader):
    """ One row of the sweep table """

    input_idx, output_idx = pair
    if param == 'bins':
        entry = evaluate_pair(data, input_idx, output_idx, config.layer_config(), config.seeds(),
                              value, config['binning_strategy'], config.train_config(),
                              config['jobs'], config['split_seed'])
        return _entry_row(param, value, entry)

    if param == 'depth':
        # deep stacks train with batch norm, and with skips from three blocks on
        cfg = config.layer_config(depth=value, use_batchnorm=True, use_skip=value >= 3)
        entry = evaluate_pair(data, input_idx, output_idx, cfg, config.seeds(), config['num_bins'],
                              config['binning_strategy'], config.train_config(), config['jobs'],
                              config['split_seed'])
        return _entry_row(param, value, entry)

    results = run_multiple(data, matrix_loader(), config.target_index(), value,
                           config['concat_methods'], cfg=config.layer_config(), seeds=config.seeds(),
                           embed_dim=config['embed_dim'], num_bins=config['num_bins'],
                           strategy=config['binning_strategy'], train_config=config.train_config(),
                           split_seed=config['split_seed'], jobs=config['jobs'])
    trained = [r.accuracy for r in results if r.excluded_reason is None]
    survivors = len(set(r.combination for r in results))
    return {'param': param, 'value': value, 'status': 'ok' if trained else 'empty',
            'accuracy': float(np.mean(trained)) if trained else None,
            'std': float(np.std(trained)) if trained else None,
            'survivors': survivors, 'error': None}


@cli.command(help="Vary bins, depth or threshold and tabulate the accuracy")
@run_options
@model_options
@click.option('--param', type=click.Choice(SWEEP_PARAMS), required=True, help="Swept setting")
@click.option('--range', 'value_range', help="a..b, a..b:step or a comma list")
@click.option('--input', 'input_name', type=click.Choice(FEATURE_NAMES), default='pr',
              show_default=True, help="Predicting feature (bins, depth)")
@click.option('--output', 'output_name', type=click.Choice(FEATURE_NAMES), default='avglen',
              show_default=True, help="Predicted feature (bins, depth)")
@click.option('--target', type=click.Choice(FEATURE_NAMES), help="Target feature (threshold)")
@click.option('--matrix', 'matrix_path', type=click.Path(exists=True, dir_okay=False),
              help="Reuse a correlation.json (threshold)")
@click.option('--resume', is_flag=True, help="Skip cells finished by an earlier run")
def sweep(config_path, out_dir, param, value_range, input_name, output_name, matrix_path, resume,
          **options):
    """ sweep.csv plus one JSON file per cell under cells/ """

    values = parse_values(param, value_range)
    config = load_run(config_path, out_dir, options)
    data = config.load_dataset()
    cells_dir = os.path.join(out_dir, 'cells')
    if not os.path.isdir(cells_dir):
        os.makedirs(cells_dir)

    cache = {}

    def matrix_loader():
        if 'matrix' not in cache:
            stored = os.path.join(out_dir, 'correlation.json')
            if matrix_path:
                cache['matrix'] = CorrelationMatrix.from_json(matrix_path)
            elif resume and os.path.isfile(stored):
                cache['matrix'] = CorrelationMatrix.from_json(stored)
            else:
                cache['matrix'] = _correlation_matrix(config, data, out_dir)
        return cache['matrix']

    pair = (FEATURE_NAMES.index(input_name), FEATURE_NAMES.index(output_name))
    rows = []
    for value in values:
        cell_path = os.path.join(cells_dir, "{}-{}.json".format(param, value))
        if resume and os.path.isfile(cell_path):
            row = read_json(cell_path)
            if row.get('status') != 'failed':
                LOGGER.info("Cell %s=%s already done", param, value)
                rows.append(row)
                continue
        try:
            row = sweep_cell(param, value, config, data, pair, matrix_loader)
        except (Fea2FeaException, ValueError) as error:
            LOGGER.warning("Cell %s=%s failed: %s", param, value, error)
            row = {'param': param, 'value': value, 'status': 'failed', 'accuracy': None,
                   'std': None, 'survivors': None, 'error': str(error)}
        write_json(cell_path, row)
        rows.append(row)

    path = os.path.join(out_dir, 'sweep.csv')
    write_csv(path, SWEEP_FIELDS, rows)
    failed = sum(1 for row in rows if row['status'] == 'failed')
    click.echo("sweep: {} over {} values, {} failed -> {}".format(param, len(rows), failed, path))


@cli.command(help="Histogram every structural feature")
@run_options
@click.option('--bins', 'num_bins', type=int, default=10, show_default=True,
              help="Histogram bins per feature")
def distribution(config_path, out_dir, num_bins, **options):
    """ distribution.csv and distribution.json """

    config = load_run(config_path, out_dir, options)
    summaries = feature_histograms(_feature_matrix(config.load_dataset()), num_bins)
    rows = []
    for summary in summaries:
        for index, count in enumerate(summary['counts']):
            rows.append({'feature': summary['feature'], 'bin': index,
                         'low': float(summary['edges'][index]),
                         'high': float(summary['edges'][index + 1]), 'count': count})
    write_csv(os.path.join(out_dir, 'distribution.csv'),
              ('feature', 'bin', 'low', 'high', 'count'), rows)
    write_json(os.path.join(out_dir, 'distribution.json'), summaries)
    click.echo("distribution: " + ", ".join("{} mode {:.2f}".format(s['feature'], s['mode_fraction'])
                                            for s in summaries))


def main():
    """ setuptools entrypoint """
    # The decorators handle all missing keyword args, so disable them:
    # pylint: disable=no-value-for-parameter,unexpected-keyword-arg
    cli(obj={})
