//! SLIC superpixels and the two segment-level transforms.
//!
//! Segmentation is deterministic: seeds sit on a regular grid, centers are
//! visited in index order with strict-improvement ties, and sums run in raster
//! order. After the final iteration, 4-connected fragments become separate
//! labels and fragments below a quarter of the nominal superpixel area are
//! merged, smallest first, into their largest neighbour. Merging continues
//! past that threshold until at most `2 * n_segments` labels remain.

use std::collections::{BTreeSet, VecDeque};

use crate::block::{identity_map, shuffle_positions};
use crate::color::rgb_to_lab;
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::rng::{combine, seeded_permutation};
use crate::spec::Probability;

pub const DEFAULT_COMPACTNESS: f64 = 10.0;
pub const DEFAULT_ITERATIONS: u32 = 10;

/// Per-pixel superpixel labels, compact in `0..n_labels`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMap {
    width: u32,
    height: u32,
    labels: Vec<u32>,
    n_labels: u32,
}

impl SegmentMap {
    /// Wraps an existing label array. Labels must be exactly `0..n` with
    /// every label used at least once.
    pub fn from_labels(width: u32, height: u32, labels: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        let expected = width as usize * height as usize;
        if labels.len() != expected {
            return Err(Error::DataLength {
                expected,
                actual: labels.len(),
            });
        }
        let n_labels = labels.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; n_labels as usize];
        for &l in &labels {
            seen[l as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidSpec {
                field: "labels".into(),
                reason: format!("label {missing} has no pixels"),
            });
        }
        Ok(Self {
            width,
            height,
            labels,
            n_labels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn n_labels(&self) -> u32 {
        self.n_labels
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, x: u32, y: u32) -> u32 {
        self.labels[y as usize * self.width as usize + x as usize]
    }

    /// Raster indices of each segment's pixels, in raster order.
    pub fn segment_pixels(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_labels as usize];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(i);
        }
        out
    }

    /// Gray image with labels spread over `0..=255`.
    pub fn to_label_image(&self) -> ImageBuffer {
        let top = u64::from(self.n_labels.saturating_sub(1).max(1));
        let data = self
            .labels
            .iter()
            .map(|&l| (u64::from(l) * 255 / top) as u8)
            .collect();
        ImageBuffer::from_raw(self.width, self.height, 1, data).expect("label map geometry")
    }

    fn check_matches(&self, img: &ImageBuffer) -> Result<()> {
        if self.width != img.width() || self.height != img.height() {
            return Err(Error::DimensionMismatch {
                width: img.width(),
                height: img.height(),
                map_width: self.width,
                map_height: self.height,
            });
        }
        Ok(())
    }
}

struct Center {
    x: f64,
    y: f64,
    color: [f64; 3],
}

fn pixel_features(img: &ImageBuffer) -> Vec<[f64; 3]> {
    match img.channels() {
        3 => img
            .as_bytes()
            .chunks_exact(3)
            .map(|p| rgb_to_lab([p[0], p[1], p[2]]))
            .collect(),
        _ => img
            .as_bytes()
            .iter()
            .map(|&v| [f64::from(v), 0.0, 0.0])
            .collect(),
    }
}

/// Seed grid dimensions `(cols, rows)`: roughly square cells, `cols * rows`
/// close to `k` and never above `1.5 * k`.
fn seed_grid(k: u32, width: u32, height: u32) -> (u32, u32) {
    let (k_f, w, h) = (f64::from(k), f64::from(width), f64::from(height));
    let cols = ((k_f * w / h).sqrt().round() as u32).clamp(1, k.min(width));
    let rows = ((k_f / f64::from(cols)).round() as u32).clamp(1, height);
    (cols, rows)
}

/// SLIC over (color, x, y). Color is CIELAB for RGB input and raw intensity
/// for gray input; the spatial term is scaled by `compactness / S` where `S`
/// is the seed spacing.
pub fn superpixel_segment(
    img: &ImageBuffer,
    n_segments: u32,
    compactness: f64,
    iterations: u32,
) -> Result<SegmentMap> {
    if n_segments == 0 {
        return Err(Error::ZeroParameter { name: "n_segments" });
    }
    if iterations == 0 {
        return Err(Error::ZeroParameter { name: "iterations" });
    }
    if !(compactness.is_finite() && compactness >= 0.0) {
        return Err(Error::InvalidSpec {
            field: "compactness".into(),
            reason: format!("{compactness} is not a finite non-negative number"),
        });
    }
    let (w, h) = (img.width(), img.height());
    let n = img.pixel_count();
    if n_segments as usize > n {
        return Err(Error::TooManySegments {
            requested: n_segments,
            pixels: n,
        });
    }

    let features = pixel_features(img);
    let (cols, rows) = seed_grid(n_segments, w, h);
    let step_x = f64::from(w) / f64::from(cols);
    let step_y = f64::from(h) / f64::from(rows);
    let spacing = (step_x * step_y).sqrt();
    let spatial_weight = (compactness / spacing).powi(2);

    let mut centers: Vec<Center> = Vec::with_capacity((cols * rows) as usize);
    for r in 0..rows {
        for c in 0..cols {
            let x = (f64::from(c) + 0.5) * step_x;
            let y = (f64::from(r) + 0.5) * step_y;
            let idx =
                (y as usize).min(h as usize - 1) * w as usize + (x as usize).min(w as usize - 1);
            centers.push(Center {
                x,
                y,
                color: features[idx],
            });
        }
    }

    let mut labels: Vec<u32> = (0..n)
        .map(|i| {
            let (x, y) = ((i % w as usize) as f64 + 0.5, (i / w as usize) as f64 + 0.5);
            let c = ((x / step_x) as u32).min(cols - 1);
            let r = ((y / step_y) as u32).min(rows - 1);
            r * cols + c
        })
        .collect();
    let mut dist = vec![f64::INFINITY; n];

    for _ in 0..iterations {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        for (k, center) in centers.iter().enumerate() {
            let x0 = (center.x - step_x).floor().max(0.0) as u32;
            let x1 = ((center.x + step_x).ceil() as u32).min(w);
            let y0 = (center.y - step_y).floor().max(0.0) as u32;
            let y1 = ((center.y + step_y).ceil() as u32).min(h);
            for y in y0..y1 {
                let dy = f64::from(y) + 0.5 - center.y;
                for x in x0..x1 {
                    let i = y as usize * w as usize + x as usize;
                    let dx = f64::from(x) + 0.5 - center.x;
                    let f = &features[i];
                    let dc = (f[0] - center.color[0]).powi(2)
                        + (f[1] - center.color[1]).powi(2)
                        + (f[2] - center.color[2]).powi(2);
                    let d = dc + spatial_weight * (dx * dx + dy * dy);
                    if d < dist[i] {
                        dist[i] = d;
                        labels[i] = k as u32;
                    }
                }
            }
        }

        let mut sums = vec![[0.0f64; 6]; centers.len()];
        for (i, &l) in labels.iter().enumerate() {
            let s = &mut sums[l as usize];
            let f = &features[i];
            s[0] += (i % w as usize) as f64 + 0.5;
            s[1] += (i / w as usize) as f64 + 0.5;
            s[2] += f[0];
            s[3] += f[1];
            s[4] += f[2];
            s[5] += 1.0;
        }
        for (center, s) in centers.iter_mut().zip(&sums) {
            if s[5] > 0.0 {
                center.x = s[0] / s[5];
                center.y = s[1] / s[5];
                center.color = [s[2] / s[5], s[3] / s[5], s[4] / s[5]];
            }
        }
    }

    let min_size = (n / centers.len() / 4).max(1);
    let max_labels = (2 * n_segments as usize).min(n);
    let labels = enforce_connectivity(&labels, w as usize, h as usize, min_size, max_labels);
    SegmentMap::from_labels(w, h, labels)
}

/// Splits clusters into 4-connected components, then merges small ones
/// (and, if still too many, the smallest ones) into their largest neighbour.
fn enforce_connectivity(
    clusters: &[u32],
    width: usize,
    height: usize,
    min_size: usize,
    max_labels: usize,
) -> Vec<u32> {
    let n = clusters.len();
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut firsts = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let cluster = clusters[start];
        comp[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = (i % width, i / width);
            let mut visit = |j: usize| {
                if comp[j] == usize::MAX && clusters[j] == cluster {
                    comp[j] = id;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < width {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - width);
            }
            if y + 1 < height {
                visit(i + width);
            }
        }
        sizes.push(size);
        firsts.push(start);
    }

    let count = sizes.len();
    let mut adjacency = vec![BTreeSet::new(); count];
    for i in 0..n {
        let (x, y) = (i % width, i / width);
        if x + 1 < width && comp[i] != comp[i + 1] {
            adjacency[comp[i]].insert(comp[i + 1]);
            adjacency[comp[i + 1]].insert(comp[i]);
        }
        if y + 1 < height && comp[i] != comp[i + width] {
            adjacency[comp[i]].insert(comp[i + width]);
            adjacency[comp[i + width]].insert(comp[i]);
        }
    }

    let mut parent: Vec<usize> = (0..count).collect();
    let mut alive: BTreeSet<(usize, usize, usize)> =
        (0..count).map(|c| (sizes[c], firsts[c], c)).collect();
    while let Some(&(size, first, c)) = alive.iter().next() {
        if size >= min_size && alive.len() <= max_labels {
            break;
        }
        let target = adjacency[c]
            .iter()
            .copied()
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(firsts[b].cmp(&firsts[a])));
        let Some(target) = target else { break };

        alive.remove(&(size, first, c));
        alive.remove(&(sizes[target], firsts[target], target));
        sizes[target] += size;
        firsts[target] = firsts[target].min(first);
        alive.insert((sizes[target], firsts[target], target));
        parent[c] = target;

        let neighbours = std::mem::take(&mut adjacency[c]);
        for nb in neighbours {
            adjacency[nb].remove(&c);
            if nb != target {
                adjacency[nb].insert(target);
                adjacency[target].insert(nb);
            }
        }
    }

    let root = |mut c: usize| {
        while parent[c] != c {
            c = parent[c];
        }
        c
    };
    let mut relabel = vec![u32::MAX; count];
    let mut next = 0u32;
    comp.iter()
        .map(|&c| {
            let r = root(c);
            if relabel[r] == u32::MAX {
                relabel[r] = next;
                next += 1;
            }
            relabel[r]
        })
        .collect()
}

/// Fills every segment with the pixels of another segment chosen by one
/// seeded permutation of the labels. Donor pixels are read in raster order,
/// cycling when the donor is smaller and truncating when it is larger.
pub fn segmentation_displacement_shuffle(
    img: &ImageBuffer,
    seg: &SegmentMap,
    swap: bool,
    seed: u64,
) -> Result<ImageBuffer> {
    seg.check_matches(img)?;
    if !swap {
        return Ok(img.clone());
    }
    let segments = seg.segment_pixels();
    let perm = seeded_permutation(seed, segments.len());
    let mut source = identity_map(img.pixel_count());
    for (receiver, &donor) in segments.iter().zip(&perm) {
        let donor = &segments[donor];
        for (j, &pos) in receiver.iter().enumerate() {
            source[pos] = donor[j % donor.len()];
        }
    }
    Ok(img.gather(&source))
}

/// Independent probabilistic shuffle inside every segment; segment `l` uses
/// the sub-seed `combine(seed, l)`.
pub fn segmentation_within_shuffle(
    img: &ImageBuffer,
    seg: &SegmentMap,
    p: Probability,
    seed: u64,
) -> Result<ImageBuffer> {
    seg.check_matches(img)?;
    let mut source = identity_map(img.pixel_count());
    for (label, pixels) in seg.segment_pixels().iter().enumerate() {
        shuffle_positions(&mut source, pixels, p, combine(seed, label as u64));
    }
    Ok(img.gather(&source))
}
