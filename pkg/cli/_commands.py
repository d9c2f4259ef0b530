import json
import logging
import os
import sys

from utils import DataError, UsageError, make_rng, prepare_output_dir, write_json
from datasets import GeneratorParams, CorpusConfig, Corpus, generate_corpus
from encoders import make_backend, embed_corpus, save_store, load_store
from evaluation import CONDITIONS, ablation_table, report_summary_json
from diffusion import LAYOUTS, FULL, load_checkpoint
from pipeline import TrainConfig, ConversionRequest, EvaluationConfig, EMOTION_SOURCES, train, convert, evaluate
from analysis import (DEFAULT_UTTERANCES, speaker_embeddings, distance_tables, diagonal_dominance,
                      export_embeddings)

logger = logging.getLogger(__name__)


def echo_config(command, config, **extra):
    """Prints the fully resolved configuration of a subcommand to stderr."""
    effective = dict(config.to_dict(), command=command, **extra)
    print('config: ' + json.dumps(effective, sort_keys=True), file=sys.stderr)


def _required(value, flag, key):
    if value is None:
        raise UsageError('{} is required (flag or "{}" in the config file)'.format(flag, key))
    return value


def synth_corpus(args, config):
    out = _required(args.out or config.corpus, '--out', 'corpus')
    n_speakers = args.speakers if args.speakers is not None else GeneratorParams.n_speakers
    seen = args.seen if args.seen is not None else n_speakers // 2
    echo_config('synth-corpus', config, out=out, speakers=n_speakers, seen=seen)
    try:
        params = GeneratorParams(master_seed=config.seed, n_speakers=n_speakers)
        speakers = params.speakers
        corpus_config = CorpusConfig(out_dir=out, generator=params, seen_speakers=speakers[:seen],
                                     unseen_speakers=speakers[seen:], split_sizes=config.split_sizes,
                                     n_jobs=config.n_jobs)
    except ValueError as e:
        raise UsageError(str(e)) from e
    corpus = generate_corpus(corpus_config).validate()
    print(corpus.path)
    return 0


def embed(args, config):
    manifest = _required(args.corpus or config.corpus, '--corpus', 'corpus')
    out = _required(args.out or config.embeddings, '--out', 'embeddings')
    if config.backend != 'oracle':
        raise UsageError('External embeddings are computed outside this tool; pass their store to train directly')
    echo_config('embed', config, out=out)
    corpus = Corpus(manifest)
    prepare_output_dir(out)
    store = embed_corpus(corpus, make_backend('oracle', params=corpus.params, dims=config.dims))
    save_store(store, out)
    print(out)
    return 0


def train_command(args, config):
    train_config = TrainConfig(manifest=_required(args.corpus or config.corpus, '--corpus', 'corpus'),
                               store=_required(args.embeddings or config.embeddings, '--embeddings', 'embeddings'),
                               out_dir=_required(args.out or config.checkpoint, '--out', 'checkpoint'),
                               steps=args.steps, batch_size=args.batch_size, learning_rate=args.learning_rate,
                               crop_segments=args.crop_segments, seed=config.seed,
                               checkpoint_interval=args.checkpoint_interval, backend=config.backend,
                               preset=config.preset, layout=args.layout, T=config.T,
                               beta_start=config.beta_start, beta_end=config.beta_end, resume=args.resume)
    echo_config('train', config, train=train_config.to_dict())
    print(train(train_config))
    return 0


def convert_command(args, config):
    request = ConversionRequest(source=args.source, reference=args.reference,
                                checkpoint=_required(args.checkpoint or config.checkpoint, '--checkpoint',
                                                     'checkpoint'),
                                output=args.out, emotion_source=args.emotion_from, seed=config.seed,
                                backend=config.backend, manifest=args.corpus or config.corpus,
                                store=args.embeddings or config.embeddings,
                                extra_references=tuple(args.extra_reference or ()))
    echo_config('convert', config, source=request.source, reference=request.reference, output=request.output,
                emotion_source=request.emotion_source, extra_references=list(request.extra_references))
    if os.path.exists(request.output):
        raise DataError('Output {} already exists; conversion outputs are write-once'.format(request.output))
    convert(request)
    print(request.output)
    return 0


def evaluate_command(args, config):
    manifest = _required(args.corpus or config.corpus, '--corpus', 'corpus')
    checkpoints = args.checkpoint or ([config.checkpoint] if config.checkpoint else None)
    checkpoints = _required(checkpoints, '--checkpoint', 'checkpoint')
    out = _required(args.out or config.reports, '--out', 'reports')
    conditions = ('S2S',) if args.ablation else tuple(args.conditions or CONDITIONS)
    echo_config('evaluate', config, checkpoints=list(checkpoints), out=out, pairs=args.pairs,
                conditions=list(conditions), emotion_source=args.emotion_from, ablation=args.ablation)
    if args.ablation:
        layouts = [load_checkpoint(path).layout for path in checkpoints]
        if len(set(layouts)) != len(layouts):
            raise UsageError('Ablation needs one checkpoint per conditioning layout, got {}'.format(layouts))
    prepare_output_dir(out)
    reports = {}
    for i, path in enumerate(checkpoints):
        report = evaluate(EvaluationConfig(manifest=manifest, checkpoint=path, backend=config.backend,
                                           store=args.embeddings or config.embeddings,
                                           pairs_per_condition=args.pairs, conditions=conditions,
                                           emotion_source=args.emotion_from, seed=config.seed,
                                           n_jobs=config.n_jobs))
        name = 'report' if len(checkpoints) == 1 else 'report_{:02d}'.format(i)
        report.to_json(os.path.join(out, name + '.json'))
        with open(os.path.join(out, name + '.txt'), 'w') as f:
            f.write(report.to_text() + '\n')
        reports[report.meta['layout']] = report
        if not args.ablation:
            print(report_summary_json(report))
    if args.ablation:
        table = ablation_table(reports)
        with open(os.path.join(out, 'ablation.txt'), 'w') as f:
            f.write(table + '\n')
        print(table)
    return 0


def _export_selection(labels, per_speaker, seed):
    if per_speaker is None:
        return None
    selection = []
    for speaker, rows in labels.groupby('speaker', sort=False):
        ids = list(rows['utterance_id'])
        chosen = make_rng(seed, 'export', speaker).permutation(len(ids))[:per_speaker]
        selection.extend(ids[i] for i in sorted(chosen))
    return selection


def analyze(args, config):
    store_path = _required(args.embeddings or config.embeddings, '--embeddings', 'embeddings')
    out = _required(args.out or config.reports, '--out', 'reports')
    echo_config('analyze', config, embeddings=store_path, out=out, max_utterances=args.max_utterances,
                export=args.export, export_per_speaker=args.export_per_speaker)
    store = load_store(store_path)
    labels, vectors = speaker_embeddings(store, kind=args.kind)
    if not len(labels):
        raise DataError('The store at {} holds no {} vectors'.format(store_path, args.kind))
    prepare_output_dir(out)
    tables = distance_tables(labels, vectors, config.seed, speakers=args.speaker, emotions=args.emotions,
                             max_utterances=args.max_utterances, n_jobs=config.n_jobs)
    summary = {}
    texts = []
    for table in tables:
        table.to_json(os.path.join(out, 'distance_{}.json'.format(table.speaker)))
        report = diagonal_dominance(table)
        summary[table.speaker] = {'diagonal_dominance': report.holds, 'detail': report.describe()}
        texts.append(table.to_text())
    with open(os.path.join(out, 'distance_tables.txt'), 'w') as f:
        f.write('\n\n'.join(texts) + '\n')
    write_json(summary, os.path.join(out, 'dominance.json'))
    if args.export:
        selection = _export_selection(labels, args.export_per_speaker, config.seed)
        export_embeddings(store, selection, os.path.join(out, 'embeddings.tsv'), kind=args.kind)
    print(json.dumps({s: v['diagonal_dominance'] for s, v in summary.items()}, sort_keys=True))
    return 0


def schedule_info(args, config):
    echo_config('schedule-info', config)
    schedule = config.schedule
    print('t\tbeta\talpha\talpha_bar\tsigma')
    for t in range(1, schedule.T + 1):
        print('{}\t{:.10g}\t{:.10g}\t{:.10g}\t{:.10g}'.format(t, schedule.beta(t), schedule.alpha(t),
                                                         schedule.alpha_bar(t), schedule.sigma(t)))
    print('alpha_bar = [{}]'.format(', '.join('{:.10g}'.format(a) for a in schedule.alpha_bars)))
    return 0


def add_subcommands(subparsers, common):
    p = subparsers.add_parser('synth-corpus', parents=[common], help='write the synthetic expressive corpus')
    p.add_argument('--out', help='corpus directory (write-once)')
    p.add_argument('--speakers', type=int, help='number of synthetic speakers')
    p.add_argument('--seen', type=int, help='speakers with a train split; the rest are unseen')
    p.add_argument('--split-sizes', type=int, nargs=3, metavar=('TRAIN', 'REFERENCE', 'TEST'),
                   help='utterances per (speaker, emotion) cell')
    p.set_defaults(func=synth_corpus)

    p = subparsers.add_parser('embed', parents=[common], help='precompute oracle embeddings of a corpus')
    p.add_argument('--corpus', help='corpus manifest or directory')
    p.add_argument('--out', help='embedding store directory (write-once)')
    p.set_defaults(func=embed)

    p = subparsers.add_parser('train', parents=[common], help='train the diffusion decoder')
    p.add_argument('--corpus', help='corpus manifest or directory')
    p.add_argument('--embeddings', help='embedding store directory')
    p.add_argument('--out', help='training output directory (write-once)')
    p.add_argument('--steps', type=int, default=TrainConfig.steps)
    p.add_argument('--batch-size', type=int, default=TrainConfig.batch_size)
    p.add_argument('--learning-rate', type=float, default=TrainConfig.learning_rate)
    p.add_argument('--crop-segments', type=int, default=TrainConfig.crop_segments)
    p.add_argument('--checkpoint-interval', type=int, default=TrainConfig.checkpoint_interval)
    p.add_argument('--layout', choices=LAYOUTS, default=FULL, help='conditioning layout')
    p.add_argument('--resume', help='checkpoint to continue from')
    p.set_defaults(func=train_command)

    p = subparsers.add_parser('convert', parents=[common], help='convert one utterance')
    p.add_argument('--source', required=True, help='source WAV (content, and emotion by default)')
    p.add_argument('--reference', required=True, help='reference WAV of the target speaker')
    p.add_argument('--extra-reference', action='append', help='further reference WAVs averaged into the speaker')
    p.add_argument('--checkpoint', help='decoder checkpoint')
    p.add_argument('--out', required=True, help='output WAV')
    p.add_argument('--emotion-from', choices=EMOTION_SOURCES, default='source')
    p.add_argument('--corpus', help='corpus manifest (oracle backend)')
    p.add_argument('--embeddings', help='embedding store (external backend)')
    p.set_defaults(func=convert_command)

    p = subparsers.add_parser('evaluate', parents=[common], help='score conversions over the test split')
    p.add_argument('--corpus', help='corpus manifest or directory')
    p.add_argument('--checkpoint', nargs='+', help='decoder checkpoint(s)')
    p.add_argument('--embeddings', help='embedding store (external backend)')
    p.add_argument('--out', help='report directory (write-once)')
    p.add_argument('--pairs', type=int, default=EvaluationConfig.pairs_per_condition,
                   help='conversions per condition')
    p.add_argument('--conditions', nargs='+', choices=CONDITIONS)
    p.add_argument('--emotion-from', choices=EMOTION_SOURCES, default='source')
    p.add_argument('--ablation', action='store_true', help='S2S table over one checkpoint per layout')
    p.set_defaults(func=evaluate_command)

    p = subparsers.add_parser('analyze', parents=[common], help='emotion-pair distance tables of speaker vectors')
    p.add_argument('--embeddings', help='embedding store directory')
    p.add_argument('--out', help='analysis directory (write-once)')
    p.add_argument('--kind', choices=('speaker', 'emotion'), default='speaker')
    p.add_argument('--speaker', nargs='+', help='speakers to tabulate, all by default')
    p.add_argument('--emotions', nargs='+', help='row and column order')
    p.add_argument('--max-utterances', type=int, default=DEFAULT_UTTERANCES, help='utterances per speaker')
    p.add_argument('--export', action='store_true', help='also write embeddings.tsv for 2-D projection')
    p.add_argument('--export-per-speaker', type=int, help='random utterances per speaker to export')
    p.set_defaults(func=analyze)

    p = subparsers.add_parser('schedule-info', parents=[common], help='print the noise schedule tables')
    p.add_argument('--T', type=int, dest='T')
    p.add_argument('--beta-start', type=float)
    p.add_argument('--beta-end', type=float)
    p.set_defaults(func=schedule_info)
