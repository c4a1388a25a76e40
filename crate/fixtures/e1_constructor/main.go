package main

import "fmt"

type Client struct {
	name string
}

func NewClient(name string) *Client {
	return &Client{name: name}
}

func New() *Client {
	return NewClient("default")
}

func Newton(x float64) float64 {
	return x / 2
}

func main() {
	c := NewClient("fixture")
	d := New()
	fmt.Println(c.name, d.name, Newton(4))
}
