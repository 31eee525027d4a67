//! Connected-component labeling of foreground masks and blob descriptors.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

/// Row-major foreground raster; `true` marks foreground.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    /// Panics if `bits.len() != width * height`.
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), width * height, "mask length must equal width * height");
        Self { width, height, bits }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Component ids per pixel: 0 is unlabeled, components are numbered `1..=count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: u32,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Number of components.
    pub fn count(&self) -> u32 {
        self.count
    }

    /// The mask this map labels.
    pub fn support(&self) -> BinaryMask {
        BinaryMask::from_bits(self.width, self.height, self.labels.iter().map(|&l| l != 0).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub id: u32,
    pub area: usize,
    /// Inclusive `(min_x, min_y, max_x, max_y)`.
    pub bbox: [usize; 4],
    pub centroid: (f64, f64),
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        // slot 0 is the background sentinel
        Self { parent: vec![0] }
    }

    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        // smaller id becomes the root so roots stay stable in scan order
        let (root, child) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[child as usize] = root;
        root
    }
}

/// Two-pass labeling with union-find; final ids are dense and assigned in
/// row-major order of first appearance.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> LabelMap {
    let (w, h) = (mask.width, mask.height);
    let mut provisional = vec![0u32; w * h];
    let mut uf = UnionFind::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask.bits[i] {
                continue;
            }
            let mut neighbours = [0u32; 4];
            let mut n = 0;
            if x > 0 {
                neighbours[n] = provisional[i - 1];
                n += 1;
            }
            if y > 0 {
                neighbours[n] = provisional[i - w];
                n += 1;
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        neighbours[n] = provisional[i - w - 1];
                        n += 1;
                    }
                    if x + 1 < w {
                        neighbours[n] = provisional[i - w + 1];
                        n += 1;
                    }
                }
            }
            let mut label = 0;
            for &nb in neighbours[..n].iter().filter(|&&l| l != 0) {
                label = if label == 0 { nb } else { uf.union(label, nb) };
            }
            provisional[i] = if label == 0 { uf.make_set() } else { label };
        }
    }

    let mut dense = vec![0u32; uf.parent.len()];
    let mut count = 0;
    for l in provisional.iter_mut().filter(|l| **l != 0) {
        let root = uf.find(*l) as usize;
        if dense[root] == 0 {
            count += 1;
            dense[root] = count;
        }
        *l = dense[root];
    }

    LabelMap { width: w, height: h, labels: provisional, count }
}

/// Blob descriptors for components with at least `min_area` pixels, largest first.
pub fn extract_blobs(labels: &LabelMap, min_area: usize) -> Vec<Blob> {
    struct Acc {
        area: usize,
        sx: usize,
        sy: usize,
        bbox: [usize; 4],
    }
    let mut acc: Vec<Acc> = (0..labels.count)
        .map(|_| Acc { area: 0, sx: 0, sy: 0, bbox: [usize::MAX, usize::MAX, 0, 0] })
        .collect();
    for (i, &l) in labels.labels.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let (x, y) = (i % labels.width, i / labels.width);
        let a = &mut acc[l as usize - 1];
        a.area += 1;
        a.sx += x;
        a.sy += y;
        a.bbox[0] = a.bbox[0].min(x);
        a.bbox[1] = a.bbox[1].min(y);
        a.bbox[2] = a.bbox[2].max(x);
        a.bbox[3] = a.bbox[3].max(y);
    }
    let mut blobs: Vec<Blob> = acc
        .into_iter()
        .enumerate()
        .filter(|(_, a)| a.area > 0 && a.area >= min_area)
        .map(|(i, a)| Blob {
            id: i as u32 + 1,
            area: a.area,
            bbox: a.bbox,
            centroid: (a.sx as f64 / a.area as f64, a.sy as f64 / a.area as f64),
        })
        .collect();
    blobs.sort_by(|a, b| b.area.cmp(&a.area).then(a.id.cmp(&b.id)));
    blobs
}
