use super::{CompressionParams, EdgeId, Graph, GraphError, ParamInt, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Left,
    Middle,
    Right,
}

/// The cylinder with `k` rows and `middle + 2 * ear` columns; every column is a
/// cycle (a single vertical edge when `k = 2`).
///
/// Rows and columns are 1-based in the coordinate API; vertex ids are
/// row-major and 0-based.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub k: usize,
    pub c: usize,
    pub width: usize,
    pub middle: usize,
    pub ear: usize,
    pub moduli: Vec<usize>,
    graph: Graph,
}

impl Cylinder {
    pub fn new(
        k: usize,
        c: usize,
        moduli: Vec<usize>,
        middle: usize,
        ear: usize,
    ) -> Result<Self, GraphError> {
        if k < 2 || moduli.len() != k {
            return Err(GraphError::InvalidRange(format!("k = {k} with {} moduli", moduli.len())));
        }
        let width = middle + 2 * ear;
        if width < 2 {
            return Err(GraphError::InvalidRange("width below 2".into()));
        }
        let id = |row: usize, col: usize| (row - 1) * width + (col - 1);
        let mut adj = Vec::with_capacity(k * width);
        for row in 1..=k {
            for col in 1..=width {
                let mut nbrs = Vec::with_capacity(4);
                if col > 1 {
                    nbrs.push(id(row, col - 1));
                }
                if col < width {
                    nbrs.push(id(row, col + 1));
                }
                if k == 2 {
                    nbrs.push(id(3 - row, col));
                } else {
                    let up = if row == 1 { k } else { row - 1 };
                    let down = if row == k { 1 } else { row + 1 };
                    nbrs.push(id(up, col));
                    nbrs.push(id(down, col));
                }
                adj.push(nbrs);
            }
        }
        let graph = Graph::from_adjacency(adj)?;
        Ok(Cylinder { k, c, width, middle, ear, moduli, graph })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex(&self, row: usize, col: usize) -> Vertex {
        debug_assert!((1..=self.k).contains(&row) && (1..=self.width).contains(&col));
        (row - 1) * self.width + (col - 1)
    }

    /// `(row, col)`, 1-based.
    pub fn coords(&self, v: Vertex) -> (usize, usize) {
        (v / self.width + 1, v % self.width + 1)
    }

    pub fn row(&self, v: Vertex) -> usize {
        v / self.width + 1
    }

    pub fn col(&self, v: Vertex) -> usize {
        v % self.width + 1
    }

    pub fn part_of_col(&self, col: usize) -> Part {
        if col <= self.ear {
            Part::Left
        } else if col <= self.ear + self.middle {
            Part::Middle
        } else {
            Part::Right
        }
    }

    pub fn part(&self, v: Vertex) -> Part {
        self.part_of_col(self.col(v))
    }

    /// Column range of a part, inclusive.
    pub fn part_columns(&self, part: Part) -> (usize, usize) {
        match part {
            Part::Left => (1, self.ear),
            Part::Middle => (self.ear + 1, self.ear + self.middle),
            Part::Right => (self.ear + self.middle + 1, self.width),
        }
    }

    pub fn is_horizontal(&self, e: EdgeId) -> bool {
        let (a, b) = self.graph.endpoints(e);
        self.row(a) == self.row(b)
    }

    /// Up neighbor in the column cycle (row 1 wraps to row k).
    pub fn up(&self, v: Vertex) -> Vertex {
        let (row, col) = self.coords(v);
        self.vertex(if row == 1 { self.k } else { row - 1 }, col)
    }

    pub fn down(&self, v: Vertex) -> Vertex {
        let (row, col) = self.coords(v);
        self.vertex(if row == self.k { 1 } else { row + 1 }, col)
    }

    pub fn label(&self, v: Vertex) -> String {
        let (r, c) = self.coords(v);
        format!("({r},{c})")
    }

    pub fn edge_label(&self, e: EdgeId) -> String {
        let (a, b) = self.graph.endpoints(e);
        format!("{}-{}", self.label(a), self.label(b))
    }

    /// Edges of a column (vertical edges between consecutive rows).
    pub fn column_edges(&self, col: usize) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let pairs = if self.k == 2 { 1 } else { self.k };
        for row in 1..=pairs {
            let v = self.vertex(row, col);
            let w = self.down(v);
            out.push(self.graph.edge_between(v, w).expect("column edge"));
        }
        out
    }
}

pub fn build_cylinder<T: ParamInt>(params: &CompressionParams<T>) -> Result<Cylinder, GraphError> {
    let p = params.to_machine()?;
    Cylinder::new(p.k, p.c, p.moduli, p.middle_length, p.ear_length)
}
